"""Figure renderers for the trapped-pair CI study.

Read-only consumers of the solver CLI's CSV artifacts: every plotted quantity
is a CSV column; the only transforms applied here are plotting transforms
(log scales, absolute values).
"""

__version__ = "0.1.0"
