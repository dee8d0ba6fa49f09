from .notation import *
from .problem import *
from .report import *
