import sys

from edastress.cli import main

sys.exit(main())
