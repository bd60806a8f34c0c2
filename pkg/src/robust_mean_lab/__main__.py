# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

import sys

from .cli import main

sys.exit(main())
