"""Remote power-factor-correction laboratory, in software.

A deterministic circuit/instrumentation simulator exposed through a
session-controlled HTTP + WebSocket API, plus the pre-lab calculation
engine and operator CLI.
"""

__version__ = "0.1.0"
