import sys

from toriclab.cli import main

sys.exit(main())
