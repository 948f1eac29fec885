"""Age-aware dataset curation and fairness evaluation for deepfake detection work."""

__version__ = "0.1.0"
