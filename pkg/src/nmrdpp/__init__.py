"""Planning with non-Markovian rewards by translation to Markov decision processes."""

__version__ = "0.1.0"
