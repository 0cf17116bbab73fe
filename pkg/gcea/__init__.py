"""全局交叉进化算法与合作协同进化算法的实验库。"""

__version__ = "0.1.0"
