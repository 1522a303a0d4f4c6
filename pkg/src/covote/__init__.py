"""covote: collective authorization of privileged commands through a
private, weighted, Byzantine fault tolerant e-vote."""

__version__ = "0.1.0"
