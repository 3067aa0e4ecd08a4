import sys

from swb_assort.cli import main

sys.exit(main())
