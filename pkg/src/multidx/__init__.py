"""Multimodal diagnostic toolkit.

Classical ML (seven from-scratch learners under a two-layer stacked
ensemble), a trainable CNN, tabular/audio/image preprocessing, versioned
model serialization, a JSON inference service and a reproduction CLI.
"""

__version__ = "0.1.0"
