from .base import *
from .exactalg import *
from .invariants import *
from .groups import *
from .numerical import *
from .parametrize import *
from .tickets import *
