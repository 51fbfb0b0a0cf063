import sys

from partlim.cli import main

sys.exit(main())
