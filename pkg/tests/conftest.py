import sys
from pathlib import Path

# allow `import mfcc_oracle` and friends from test modules
sys.path.insert(0, str(Path(__file__).parent))
