from __future__ import annotations

import sys

from logspec.cli import main

sys.exit(main())
