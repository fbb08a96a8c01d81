# flake8: noqa

from coring_cdga import errors
from coring_cdga import exactla
from coring_cdga import report
from coring_cdga import util
from coring_cdga import config
from coring_cdga import algmod
from coring_cdga import coring
from coring_cdga import cdga
from coring_cdga import modules
from coring_cdga import equiv
from coring_cdga import comod
from coring_cdga import contra
from coring_cdga import comatrix
from coring_cdga import catalog
from coring_cdga import serialize
