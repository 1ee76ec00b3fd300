from .network import *
from .demand import *
from .slb import *
from .adjust import *
from .estimate import *
from .scenario import *
