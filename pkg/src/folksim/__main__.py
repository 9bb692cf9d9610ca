from folksim.cli import main

main()
