from .scalar import *
from .polynomial import *
from .matrix import *
from .linear import *
