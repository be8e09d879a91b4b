# 測試套件 