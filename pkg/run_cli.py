from enzyme_qssa.cli import main

if __name__ == "__main__":
    main()
