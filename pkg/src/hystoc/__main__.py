import sys

from hystoc.cli import main

sys.exit(main())
