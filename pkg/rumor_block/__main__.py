# pylint: disable=missing-docstring
import sys
from rumor_block.cli import main

sys.exit(main())
