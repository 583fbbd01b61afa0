from ogcomplex.cli import main

main()
