"""agebridge: file-format adapter between face tooling and the fairage engine.

The bridge annotates media into manifests, emits face descriptors, executes
swap plans, and extracts video frames. It talks to the engine exclusively
through the engine's interchange files and never imports it.
"""

__version__ = "0.1.0"
