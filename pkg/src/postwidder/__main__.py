import sys

from postwidder.cli import main

sys.exit(main())
