"""Static figures rendered from v2xfield comparison exports.

Every number that appears in a figure is read from the export CSVs; nothing
is recomputed from raw records here.
"""

__version__ = "0.1.0"
