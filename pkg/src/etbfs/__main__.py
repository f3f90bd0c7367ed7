import sys

from etbfs.cli import main

sys.exit(main())
