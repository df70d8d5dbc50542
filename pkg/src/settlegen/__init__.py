"""Agent-based generation of walled medieval settlements in a voxel world."""

__version__ = "0.1.0"
