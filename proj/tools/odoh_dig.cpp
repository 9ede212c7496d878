#include <iostream>

#include "odoh/client.hpp"

int main(int argc, char** argv) {
  return odoh::client::run_dig(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
