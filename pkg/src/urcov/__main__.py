import sys

from urcov.cli import main

sys.exit(main())
