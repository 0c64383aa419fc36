import sys

from cfrelay.cli import main

sys.exit(main())
