import sys
from pathlib import Path

# make the sibling oracle helpers importable from any invocation directory
sys.path.insert(0, str(Path(__file__).parent))
