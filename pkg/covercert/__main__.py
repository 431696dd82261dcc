from covercert.main import main

main()
