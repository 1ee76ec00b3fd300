from pysltc.constants import *
from pysltc.errors import *
from pysltc.functions import *
from pysltc.classes import *
from pysltc.calibration import *

__version__ = "0.1.0"
