import sys

from gradb.main import main

sys.exit(main())
