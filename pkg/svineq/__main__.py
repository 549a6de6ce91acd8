import sys

from svineq.main import main

sys.exit(main())
