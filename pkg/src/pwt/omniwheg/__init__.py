__title__ = "OmniWheg"
__version__ = "0.1.0"

# from importlib.metadata import version
# if __package__:
#    __version__ = version(__package__)
# else:
#    __version__ = "unknow"
