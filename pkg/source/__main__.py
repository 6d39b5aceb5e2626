import sys

from source.cli import main

sys.exit(main())
