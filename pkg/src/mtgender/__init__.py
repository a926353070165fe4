"""Gender-bias evaluation of machine translation on WinoMT-style challenge sets."""
__version__ = "0.1.0"
