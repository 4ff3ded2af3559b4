"""Utils module."""
from .helpers import *
from .errors import *
