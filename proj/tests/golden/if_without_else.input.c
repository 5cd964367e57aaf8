int Global;
int r;

int main() {
  if( Global == 1 ){
    r = 1;
  }
  return r;
}
