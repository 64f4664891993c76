"""Speech-based screening pipeline: acoustic and linguistic feature extraction,
from-scratch neural classifiers, and a subject-disjoint cross-validation harness."""

__version__ = "0.1.0"
