import sys

from adaptive_mlc.main import main

sys.exit(main())
