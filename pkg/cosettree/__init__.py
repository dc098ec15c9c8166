__version__ = "1.0.0"

FORMAT_TAG = "cosettree/1"
