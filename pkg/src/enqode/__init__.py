"""enqode: encoding-typed quantum state-vector toolkit.

Classical data enters quantum circuits in a handful of well-defined
encodings.  This package makes those encodings explicit objects: loaders
build circuits that realize them, converters move information between them,
extractors pull classical answers back out, and a small pipeline language
type-checks whole compositions before running them on the built-in
simulator.
"""

__version__ = "0.1.0"
