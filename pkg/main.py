#!/usr/bin/env python3
"""
K_k-free 偽隨機圖驗證工具

用法: python main.py <generate|verify|grid|census|witness> [選項]
"""

import sys

from dotenv import load_dotenv

from certifiers.cli import main

# 載入環境變數
load_dotenv()

if __name__ == "__main__":
    sys.exit(main())
