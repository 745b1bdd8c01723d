"""kmlift: exact arithmetic for twisted Koecher-Maass series of Ikeda lifts."""

__version__ = "0.1.0"
