# frogrange: распределение минимума посещённых узлов модели лягушек на ℤ
__version__ = "0.1.0"
