from braidhash.cli import main

main()
