from .data import Data
from .matrix import Matrix
from .report import Report, CheckOutcome, summarize, PASS, FAIL, INCONCLUSIVE
