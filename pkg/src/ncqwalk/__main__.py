import sys

from ncqwalk.cli import main

sys.exit(main())
