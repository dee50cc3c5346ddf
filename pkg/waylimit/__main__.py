import sys

from waylimit.cli import main

sys.exit(main())
