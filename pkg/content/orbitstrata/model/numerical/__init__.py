from .base import *
from .strata import *
