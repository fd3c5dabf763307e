import sys
from pathlib import Path

# make helper modules (qp_oracle) importable from any test
sys.path.insert(0, str(Path(__file__).parent))
