#include <iostream>

int main() {
  std::cout << "mrmoco cli placeholder\n";
  return 0;
}
