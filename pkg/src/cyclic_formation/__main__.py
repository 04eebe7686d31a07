import sys

from cyclic_formation.cli import main

if __name__ == "__main__":
    sys.exit(main())
