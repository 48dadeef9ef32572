class Square:
  def __init__(self, l):
    self.l = l
    self.name = "Square"

  def area(self):
    return self.l ** 2
