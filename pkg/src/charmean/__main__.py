import sys

from charmean.cli import main

sys.exit(main())
